// Step-kernel throughput probe: not part of the test suite.
#include <chrono>
#include <cstdio>

#include "slpulse/hierarchy.hpp"

int main(int argc, char** argv) {
    using namespace slpulse;
    const int ell = argc > 1 ? std::atoi(argv[1]) : 30;
    const int steps = argc > 2 ? std::atoi(argv[2]) : 20000;

    SimulationConfig cfg = make_config(PhysicalParams{}, DecayModel::zero(), 5.0, ell,
                                       100.0, 0.05, 0.5);
    Stepper stepper(cfg);
    FieldState state = gaussian_initial_state(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    for (int n = 0; n < steps; ++n) stepper.step(state);
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();

    const double cellrows = static_cast<double>(state.layout().n_fields()) * cfg.grid.n_z *
                            static_cast<double>(steps);
    std::printf("ell=%d n_z=%d rows=%d steps=%d: %.2f s, %.3g cell-rows/s\n", ell,
                cfg.grid.n_z, state.layout().n_fields(), steps, sec, cellrows / sec);
    std::printf("full T=100 run at this size: %.1f s (%ld steps)\n",
                sec / steps * static_cast<double>(cfg.grid.n_steps), cfg.grid.n_steps);
    return state.finite() ? 0 : 1;
}
