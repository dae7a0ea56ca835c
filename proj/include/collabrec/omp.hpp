#pragma once

// Include this instead of <omp.h> so the library still compiles without
// OpenMP (the pragmas are then ignored and everything runs serially).

#if defined(_OPENMP)
#include <omp.h>
namespace collabrec {
constexpr bool use_omp = true;
}  // namespace collabrec
#else
#pragma GCC diagnostic ignored "-Wunknown-pragmas"
namespace collabrec {
constexpr bool use_omp = false;
}  // namespace collabrec
#define omp_get_thread_num() 0
#define omp_get_max_threads() 1
#endif
