#include <iostream>
using namespace std;
int main() {
    int n;
    cin >> n;
    long long best;
    cin >> best;
    for (int k = 1; k < n; k++) {
        long long x;
        cin >> x;
        if (x > best) best = x;
    }
    cout << best << endl;
    return 0;
}
