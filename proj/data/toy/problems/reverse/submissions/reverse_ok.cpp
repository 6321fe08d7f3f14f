#include <iostream>
#include <string>
using namespace std;
int main() {
    string text;
    getline(cin, text);
    for (int i = (int)text.size() - 1; i >= 0; i--) cout << text[i];
    cout << endl;
    return 0;
}
