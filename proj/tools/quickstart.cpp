// Minimal use of the library: one slow path against its averaged limit, and the limit covariance.
#include <cstdio>

#include <fracfluct.hpp>

int main() {
    using namespace fracfluct;
    const TimeGrid grid(0.0, 1.0, 1024);
    const HurstParameter H(0.75);
    const ModelSpec model = make_catalogue_model("averaging-sine");
    const VectorXd x0 = VectorXd::Constant(1, 0.5);

    const FbmPath fbm = FbmSampler(grid, H, 1).sample(derive_seed(12345, {stream::fbm, 0}));
    const HolderPath xbar = simulate_averaged(model, fbm, x0);
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const FastPath fast = sample_ou(model.fast(), grid, eps, derive_seed(12345, {stream::fast, 0}));
        const HolderPath x = simulate_slow(model, fbm, fast, x0);
        std::printf("eps = %-6g  sup|x - xbar| = %.4f  x_T = %.4f\n", eps, sup_norm(x - xbar), x.terminal()(0));
    }
    const CovKernel sigma = sigma_kernel(model, H);
    std::printf("Sigma(0.5, 0.5) = %.6f\n", sigma.evaluate(x0, x0)(0, 0));
}
