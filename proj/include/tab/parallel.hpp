#pragma once

namespace tab {

/// Number of OpenMP workers to use. TAB_SIM_THREADS caps it; unset or 0
/// means the OpenMP default.
int worker_count();

}  // namespace tab
