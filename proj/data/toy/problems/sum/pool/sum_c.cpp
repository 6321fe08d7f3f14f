#include <cstdio>
int main() {
    long long limit, total = 0, cur = 1;
    if (scanf("%lld", &limit) != 1) return 0;
    while (cur <= limit) {
        total += cur;
        ++cur;
    }
    printf("%lld\n", total);
    return 0;
}
