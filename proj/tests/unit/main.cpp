#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "painv/numeric.hpp"

int main(int argc, char** argv) {
  painv::set_precision(256);
  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  return ctx.run();
}
