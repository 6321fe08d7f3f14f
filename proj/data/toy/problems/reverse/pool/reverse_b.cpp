#include <iostream>
#include <string>
int main() {
    std::string line;
    std::getline(std::cin, line);
    for (auto it = line.rbegin(); it != line.rend(); ++it) std::cout << *it;
    std::cout << '\n';
}
