#include <climits>
#include <iostream>
using namespace std;
int main() {
    int n;
    cin >> n;
    long long best = LLONG_MIN;
    while (n--) {
        long long x;
        cin >> x;
        best = x > best ? x : best;
    }
    cout << best << endl;
}
