#include <bits/stdc++.h>
using namespace std;
long long n, sum;
int main() {
    cin >> n;
    sum = 0;
    for (long long t = 1; t <= n; t++) {
        sum += t;
    }
    cout << sum << endl;
    return 0;
}
