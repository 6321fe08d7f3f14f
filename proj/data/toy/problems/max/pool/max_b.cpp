#include <algorithm>
#include <iostream>
#include <vector>
int main() {
    int count;
    std::cin >> count;
    std::vector<long long> values(count);
    for (auto& v : values) std::cin >> v;
    std::cout << *std::max_element(values.begin(), values.end()) << "\n";
}
