// Renders the fixture interface database to a directory.

#include <iostream>

#include "CLI11.hpp"
#include "kioskbot/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Render the kiosk fixture database"};
  std::string out;
  app.add_option("--out", out, "Output directory")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    kioskbot::fixtures::write_database(out);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
