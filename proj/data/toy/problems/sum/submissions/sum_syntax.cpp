#include <iostream>
using namespace std;
int main() {
    long long total = 0, n
    cin >> n;
    for (long long v = 1; v <= n; ++v) total += v;
    cout << total << "\n";
    return 0;
}
