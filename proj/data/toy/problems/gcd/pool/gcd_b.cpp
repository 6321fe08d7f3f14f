#include <iostream>
#include <numeric>
int main() {
    unsigned long long x, y;
    std::cin >> x >> y;
    std::cout << std::gcd(x, y) << "\n";
}
