// Writes a small four-scene corpus (annotations, FGRID raster, SGRID grid).

#include <CLI11.hpp>

#include <iostream>

#include "sceneptp/errors.hpp"
#include "sceneptp/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a toy scene corpus"};
  std::string root = "data";
  std::uint64_t seed = 1;
  bool crossing = false;
  app.add_option("root", root, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  app.add_flag("--crossing", crossing, "also write the SYNTH crossing/parallel scene");
  CLI11_PARSE(app, argc, argv);
  try {
    sceneptp::write_toy_corpus(root, seed);
    if (crossing) sceneptp::write_scene(root, sceneptp::crossing_scene());
  } catch (const sceneptp::Error& e) {
    std::cerr << "error kind=" << e.kind() << " message=\"" << e.what() << "\"\n";
    return 1;
  }
  std::cout << "wrote " << root << '\n';
  return 0;
}
