#include <cstdio>

int main() {
    std::puts("fracpoisson: placeholder");
    return 0;
}
