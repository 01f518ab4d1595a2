// Regenerates the .cps fixtures in tests/golden and their decompressed
// sample CSVs. The fixtures are committed; rerun only on a deliberate format change.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cubicpulse/cps.hpp"
#include "cubicpulse/fixed_point.hpp"
#include "cubicpulse/pulse.hpp"
#include "cubicpulse/qafit.hpp"
#include "cubicpulse/spline.hpp"

using namespace cubicpulse;
namespace fs = std::filesystem;

namespace {

void emit(const fs::path& dir, const std::string& name, const CompressedPulse& cp) {
    write_cps(dir / (name + ".cps"), cp);
    const auto out = expand(cp).samples;
    std::ofstream csv(dir / (name + ".csv"));
    csv << "index,value\n";
    for (std::size_t i = 0; i < out.size(); ++i)
        csv << i << ',' << out[i] << '\n';
    std::cout << name << ": " << cp.segments.size() << " segments, " << out.size() << " samples\n";
}

} // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : CUBICPULSE_GOLDEN_DIR;
    fs::create_directories(dir);

    CompressedPulse constant;
    constant.segments.push_back({1000, 0, 0, 0, 256});
    emit(dir, "constant", constant);

    // a cubic whose coefficients are not on the grid, split in two segments
    Pulse cubic;
    for (int t = 0; t < 2000; ++t) {
        const double x = t / 2000.0;
        cubic.samples.push_back(-12000.0 + 61000.0 * x - 72000.0 * x * x + 40000.0 * x * x * x);
    }
    emit(dir, "cubic", quantize_naive(fit_float(cubic, uniform_knots(2, cubic.size())), {}, false));

    const Pulse bw = gen_blackman(4000, 30000);
    emit(dir, "symmetric_blackman", quantize_naive(fit_float(bw, uniform_knots(4, bw.size())), {}, true));
    return 0;
}
