#include <iostream>
using namespace std;
int main() {
    long long a, b;
    cin >> a >> b;
    while (a != b) {
        if (a > b) a -= b;
        else b -= a;
    }
    cout << a << endl;
    return 0;
}
