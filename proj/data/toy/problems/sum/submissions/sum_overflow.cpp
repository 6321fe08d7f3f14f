#include <iostream>
using namespace std;
int main() {
    int M;
    cin >> M;
    int s = 0;
    for (int i = 1; i <= M; i++) {
        s += i;
    }
    cout << s << endl;
    return 0;
}
