#include <iostream>
int main() {
    long long value;
    std::cin >> value;
    std::cout << value * (value + 1) / 2 << '\n';
    return 0;
}
