#pragma once

#include "sparsetask/core.hpp"
#include "sparsetask/rng.hpp"

#include <cstdint>
#include <vector>

namespace sparsetask {

/// Parameters of the sparse generative environment. T is supplied per call.
struct EnvironmentSpec {
    int d = 20;
    int k_star = 10;
    int s = 2;
    double alpha_star = 10.0;
    double sigma = 0.1;  ///< label-noise standard deviation
    int m = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Variance of the pre-normalization draws for nonzero code entries.
inline constexpr double kCodeEntryVariance = 0.1;

struct GeneratedTasks {
    Dictionary true_dictionary;   ///< d x K*
    CodeMatrix true_codes;        ///< K* x T
    std::vector<TaskVector> true_vectors;
    MultitaskDataset dataset;
};

/// Uniform draw from the unit sphere in R^d.
[[nodiscard]] Vector sample_sphere(int d, Rng& rng);

/// s-sparse code with uniformly chosen support, Gaussian nonzeros, rescaled
/// to l1 norm alpha_star.
[[nodiscard]] Vector generate_code(int k_star, int s, double alpha_star, Rng& rng);

/// Draws a dictionary and T tasks from the environment. Stream 0 of the
/// seed generates the dictionary; task t uses stream t + 1.
[[nodiscard]] GeneratedTasks generate_environment(const EnvironmentSpec& spec, int num_tasks);

/// Draws T further tasks that share `dictionary`, using streams derived from
/// `stream_seed`. Used for fresh transfer tasks of an existing environment.
[[nodiscard]] GeneratedTasks generate_tasks(const Dictionary& dictionary,
                                            const EnvironmentSpec& spec, int num_tasks,
                                            std::uint64_t stream_seed);

/// Grayscale image with values in [0, 1], row-major h x w.
using Image = Matrix;

struct PixelTasks {
    MultitaskDataset dataset;            ///< observed pixels as indicator inputs
    std::vector<Vector> full_labels;     ///< all h*w gray levels per image
    std::vector<std::vector<Eigen::Index>> observed;  ///< observed pixel indices per image
    Eigen::Index height = 0;
    Eigen::Index width = 0;
};

/// One task per image: m distinct pixels sampled without replacement, each
/// input the indicator vector of its pixel index (row-major).
[[nodiscard]] PixelTasks generate_pixel_tasks(const std::vector<Image>& images, int m, Rng& rng);

/// Reads a PGM (P2 or P5, maxval <= 255) or a CSV matrix, rescaled to [0, 1].
[[nodiscard]] Image read_image(const std::string& path);

/// Writes an 8-bit binary PGM; values are clamped to [0, 1].
void write_pgm(const std::string& path, const Image& image);

}  // namespace sparsetask
