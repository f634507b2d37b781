#include <CLI11.hpp>
#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"tryon3d: pose-guided warping + implicit 3D garment transfer"};
  app.require_subcommand(1);
  // Subcommands are registered as the pipeline modules land.
  CLI11_PARSE(app, argc, argv);
  return 0;
}
