#include <iostream>
using namespace std;
int main() {
    int n;
    cin >> n;
    long long best = 0;
    for (int k = 0; k < n; k++) {
        long long x;
        cin >> x;
        if (x > best) best = x;
    }
    cout << best << endl;
    return 0;
}
