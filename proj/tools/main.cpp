#include <cstdio>

int main() {
    std::printf("csfd placeholder\n");
    return 0;
}
