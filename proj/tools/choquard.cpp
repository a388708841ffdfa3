#include "choq/cli.hpp"

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const choq::RunConfig config = choq::parse_config(args);
    return choq::run(config);
  } catch (const choq::HelpRequested& help) {
    std::cout << help.text;
    return 0;
  } catch (const choq::UsageError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
}
