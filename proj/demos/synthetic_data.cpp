// Writes the synthetic DCE-shaped kernels and one noisy tissue curve per
// kernel (f4, beta = 0.5) into the given directory (default: data).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "lagdeconv/csv.hpp"
#include "lagdeconv/lagdeconv.hpp"

namespace fs = std::filesystem;
using namespace lagdeconv;

namespace {

void write_series(const fs::path& path, const std::string& schema, const std::string& note,
                  const std::vector<double>& t, const std::vector<double>& v, const std::string& value_name) {
    std::ofstream out(path);
    csv::Writer w(out, schema, 1, {"t", value_name});
    w.comment(note);
    for (std::size_t i = 0; i < t.size(); ++i) w.row(t[i], v[i]);
}

void emit(const fs::path& dir, const RawKernelSamples& raw, std::uint64_t seed) {
    const auto t = rescale_times(raw.times);
    const std::string stem = raw.id == "gCT" ? "ct" : "mri";
    const std::string origin = "SYNTHETIC " + raw.id + " stand-in (gamma-variate bolus + recirculation + washout); "
                               "times rescaled from [0, " + csv::format(raw.times.back()) + "] s to [0, 10]";
    write_series(dir / ("g_" + stem + "_synthetic.csv"), "lagdeconv.series", origin, t, raw.values, "g");

    const Cell cell = setting2_cell(raw, "f4", raw.default_sigma);
    const NoiseModel noise{raw.default_sigma, NoiseDistribution::gaussian, seed};
    const auto y = noise.draw(cell.q_true, 0);
    write_series(dir / ("y_" + stem + "_f4_synthetic.csv"), "lagdeconv.series",
                 "SYNTHETIC tissue curve: trapezoid convolution of the " + raw.id + " stand-in with 0.5*exp(-2t), "
                 "Gaussian noise sigma=" + csv::format(raw.default_sigma) + ", seed=" + std::to_string(seed),
                 t, y, "y");
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : "data";
    fs::create_directories(dir);
    emit(dir, synthetic_ct_kernel(), 2024);
    emit(dir, synthetic_mri_kernel(), 2025);
    std::cout << "wrote synthetic kernels and signals to " << dir << '\n';
}
