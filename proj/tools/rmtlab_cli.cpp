#include <cstdio>

int main() {
  std::puts("rmtlab: subcommands not wired yet");
  return 2;
}
