#include <cstdio>
int main() {
    int k;
    scanf("%d", &k);
    long long acc = 0;
    int j = 1;
    while (j < k) {
        acc = acc + j;
        j++;
    }
    printf("%lld\n", acc);
}
