// Deconvolve one noisy Setting-1 signal (kernel e^{-5t}, f(t) = t^2 e^{-t}).

#include <cstdio>
#include <vector>

#include "lagdeconv/lagdeconv.hpp"

int main() {
    using namespace lagdeconv;

    const auto grid = SampleGrid::equispaced(100, 10.0);
    const KernelSpec g = kernel_by_id("g2");
    const TestFunction f = test_function("f1");

    const auto q = true_q(g, f, grid);
    const NoiseModel noise{0.1 / 32.0, NoiseDistribution::gaussian, 42};
    const auto y = noise.draw(q, 0);

    const PenaltyConfig cfg{noise.sigma, 1.0, grid.horizon(), grid.size()};
    const auto a_grid = default_a_grid();
    const DeconvFit res = fit(grid, y, g.samples(grid), cfg, a_grid);

    std::printf("a_hat = %.4f  M = %zu  m_hat = %zu  R(a_hat) = %.3e\n", res.a_hat, res.max_order, res.m_hat,
                res.residual_norm);
    const auto f_hat = reconstruct(res.f_hat, grid.times());
    std::vector<double> f_true;
    for (double t : grid.times()) f_true.push_back(f(t));
    std::printf("ISE x 1e4 = %.4f\n", 1e4 * ise(grid, f_hat, f_true));
    for (std::size_t i = 0; i < grid.size(); i += 10)
        std::printf("t = %5.2f  f = %8.5f  f_hat = %8.5f\n", grid[i], f_true[i], f_hat[i]);
}
