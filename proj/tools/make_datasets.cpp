#include <cstdio>
#include <filesystem>
#include <string>

#include "vspyct/synth.hpp"

// Regenerates the bundled CSV datasets. Run with an optional output
// directory (default: data). Fixed seeds keep the files reproducible.
int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);

  const vspyct::Dataset linear = vspyct::make_linear3d(1000, 1);
  vspyct::save_csv(linear, dir + "/linear3d.csv", "y");

  const vspyct::Dataset energy = vspyct::make_energy_style(768, 7);
  vspyct::save_csv(energy, dir + "/energy_synth.csv", "load");

  const vspyct::Dataset ridge = vspyct::make_oblique_ridge(400, 3);
  vspyct::save_csv(ridge, dir + "/oblique_ridge.csv", "y");

  std::printf("wrote %s/linear3d.csv %s/energy_synth.csv %s/oblique_ridge.csv\n",
              dir.c_str(), dir.c_str(), dir.c_str());
  return 0;
}
