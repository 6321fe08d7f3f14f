#include <cstdio>
int main() {
    int n, v[1000];
    scanf("%d", &n);
    for (int p = 0; p < n; ++p) scanf("%d", &v[p]);
    for (int p = 1; p < n; ++p) {
        int key = v[p], q = p - 1;
        while (q >= 0 && v[q] > key) {
            v[q + 1] = v[q];
            --q;
        }
        v[q + 1] = key;
    }
    for (int p = 0; p < n; ++p) printf(p ? " %d" : "%d", v[p]);
    printf("\n");
}
