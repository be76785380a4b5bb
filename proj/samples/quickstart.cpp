// Minimal tour: load a QSDP file, look at the conditions at a known KKT
// point, then solve from a perturbed start with and without correction.
//
//   ./quickstart [path/to/ex3.json]

#include <ssnsdp/ssnsdp.hpp>

#include <cstdio>

using namespace ssnsdp;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : SSNSDP_SAMPLE_DIR "/ex3.json";
  auto prob = load_qsdp(path);

  // same data as the built-in catalog entry, which also knows the solution
  const auto entry = catalog("ex3");
  const KktPoint& zbar = entry.solution->z_bar;

  const ConditionReport rep = regularity_report(*prob, zbar);
  std::printf("W-SOC %d  S-SOSC %d  W-SRCQ %d  CN %d\n", rep.w_soc.holds, rep.s_sosc.holds, rep.w_srcq.holds,
              rep.cn.holds);
  std::printf("sigma_min  U0 %.3e  UI %.3e\n", rep.u0_sigma_min, rep.ui_sigma_min);

  SolverParams prm;
  prm.delta = 0.5;
  prm.variant = Variant::zero;
  const KktPoint z0 = perturbed_start(zbar, 10.0, 2);
  const SolveResult r = ssn_solve(*prob, z0, prm, zbar);
  for (const auto& t : r.trace)
    std::printf("k=%d  |F|=%.2e  |Z-Zbar|=%.2e  sigma=%.2e\n", t.k, t.f_norm, *t.dist, t.sigma_min);
  std::printf("%s after %d iterations\n", status_name(r.status), r.iterations());

  // UI is singular at this solution; without correction Newton usually stalls or breaks down
  prm.variant = Variant::identity;
  const SolveResult plain = classical_ssn_solve(*prob, perturbed_start(zbar, 1e-3, 2), prm, zbar);
  std::printf("classical with UI: %s (%s)\n", status_name(plain.status), plain.message.c_str());
  return r.status == SolveStatus::converged ? 0 : 1;
}
