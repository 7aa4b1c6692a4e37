// Gradient-variance scaling for two ansatz families, three estimators each.

#include <cstdio>

#include <zxwgrad/barren.hpp>

using namespace zxwgrad;

int main() {
    std::printf("ring ansatz, first parameter, H = Z^n\n");
    std::printf("n   closed        quadrature    monte carlo (1e4 samples)\n");
    for (int n = 2; n <= 5; ++n) {
        std::string zn(n, 'Z');
        ParamCircuit c = build({Family::Sim1, n, 1});
        PauliHamiltonian h = expand_h_pattern("Z^n", n);
        double closed = sim1_closed(zn, 0, 1);
        double quad = variance_quadrature(c, h, 0, 3);
        McEstimate mc = variance_mc(c, h, 0, 10000, 7);
        std::printf("%d   %.6e  %.6e  %.6e +- %.1e\n", n, closed, quad, mc.value, mc.std_err);
    }

    std::printf("\nsingle-gadget ansatz at n = 3, H = Z^3, variance by layer count\n");
    std::printf("layers   closed      quadrature\n");
    for (int layers = 1; layers <= 6; ++layers) {
        double closed = iqp_closed(Family::IQP1, 3, layers, "ZZZ", 0);
        ParamCircuit c = build({Family::IQP1, 3, layers});
        double quad = variance_quadrature(c, expand_h_pattern("ZZZ", 3), 0, 2 * layers + 1);
        std::printf("%-8d %.8f  %.8f\n", layers, closed, quad);
    }
    std::printf("limit: closed form drifts toward 1/3 (%.8f at 15 layers)\n",
                iqp_closed(Family::IQP1, 3, 15, "ZZZ", 0));
    return 0;
}
