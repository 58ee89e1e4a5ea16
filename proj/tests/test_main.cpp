#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <omp.h>

int main(int argc, char** argv) {
  // Exercise the parallel kernels even on single-core runners.
  omp_set_num_threads(4);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
