// Build-time guard: the bundled dataset must reproduce the exponential anchor.
#include <cmath>
#include <cstdio>

#include "mexed/competitors.hpp"
#include "mexed/io.hpp"

int main() {
  try {
    const auto d = mexed::io::ingest(std::string(mexed::io::kBuiltinAircond));
    const auto fit = mexed::fit_model(mexed::ModelId::exponential, d);
    const bool ok = d.size() == 30 && std::fabs(fit.neg_loglik - 152.629) <= 1e-3;
    std::printf("builtin:aircond n=%zu exponential -logL=%.6f %s\n", d.size(), fit.neg_loglik, ok ? "ok" : "MISMATCH");
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "builtin:aircond check failed: %s\n", e.what());
    return 1;
  }
}
