#include "tab/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace tab {

int worker_count() {
  const int available = omp_get_max_threads();
  const char* env = std::getenv("TAB_SIM_THREADS");
  if (env == nullptr) return available;
  int cap = 0;
  const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
  if (ec != std::errc{} || cap <= 0) return available;
  return cap < available ? cap : available;
}

}  // namespace tab
