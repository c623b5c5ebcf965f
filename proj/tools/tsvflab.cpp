// Command-line front end; subcommands are wired up in main().
#include <cstdio>

int main() {
    std::puts("tsvflab: placeholder");
    return 0;
}
