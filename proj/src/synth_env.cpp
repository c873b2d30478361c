#include "sparsetask/synth_env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sparsetask {

void EnvironmentSpec::validate() const {
    if (d < 1) throw std::invalid_argument("environment: d must be >= 1");
    if (m < 1) throw std::invalid_argument("environment: m must be >= 1");
    if (k_star < 1) throw std::invalid_argument("environment: k_star must be >= 1");
    if (s < 1 || s > k_star) {
        throw std::invalid_argument("environment: s must satisfy 1 <= s <= k_star");
    }
    if (!(alpha_star > 0.0) || !std::isfinite(alpha_star)) {
        throw std::invalid_argument("environment: alpha_star must be positive");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("environment: sigma must be nonnegative");
    }
}

Vector sample_sphere(int d, Rng& rng) {
    if (d < 1) throw std::invalid_argument("sample_sphere: dimension must be >= 1");
    Vector v(d);
    double norm = 0.0;
    do {
        for (int i = 0; i < d; ++i) v[i] = rng.normal();
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

Vector generate_code(int k_star, int s, double alpha_star, Rng& rng) {
    if (k_star < 1 || s < 1 || s > k_star) {
        throw std::invalid_argument("generate_code: need 1 <= s <= k_star");
    }
    if (!(alpha_star > 0.0)) throw std::invalid_argument("generate_code: alpha_star must be > 0");
    const double stddev = std::sqrt(kCodeEntryVariance);
    Vector code = Vector::Zero(k_star);
    while (true) {
        // partial Fisher-Yates: the first s entries form a uniform s-subset
        std::vector<int> idx(static_cast<std::size_t>(k_star));
        std::iota(idx.begin(), idx.end(), 0);
        for (int j = 0; j < s; ++j) {
            const auto pick = j + static_cast<int>(rng.index(static_cast<std::uint64_t>(k_star - j)));
            std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
        }
        code.setZero();
        for (int j = 0; j < s; ++j) code[idx[static_cast<std::size_t>(j)]] = rng.normal(0.0, stddev);
        const double l1 = code.lpNorm<1>();
        if (l1 > 0.0) return code * (alpha_star / l1);
    }
}

GeneratedTasks generate_tasks(const Dictionary& dictionary, const EnvironmentSpec& spec,
                              int num_tasks, std::uint64_t stream_seed) {
    spec.validate();
    if (num_tasks < 1) throw std::invalid_argument("number of tasks must be >= 1");
    if (dictionary.dim() != spec.d || dictionary.num_atoms() != spec.k_star) {
        throw std::invalid_argument("dictionary shape does not match the environment");
    }
    const Rng root(stream_seed);
    Matrix codes(spec.k_star, num_tasks);
    std::vector<TaskVector> vectors;
    std::vector<TaskData> tasks;
    vectors.reserve(static_cast<std::size_t>(num_tasks));
    tasks.reserve(static_cast<std::size_t>(num_tasks));
    for (int t = 0; t < num_tasks; ++t) {
        Rng rng = root.child(static_cast<std::uint64_t>(t) + 1);
        codes.col(t) = generate_code(spec.k_star, spec.s, spec.alpha_star, rng);
        Vector w = dictionary.atoms() * codes.col(t);
        Matrix x(spec.m, spec.d);
        Vector y(spec.m);
        for (int i = 0; i < spec.m; ++i) {
            x.row(i) = sample_sphere(spec.d, rng).transpose();
            const double noise = rng.normal();
            y[i] = x.row(i).dot(w) + spec.sigma * noise;
        }
        tasks.emplace_back(std::move(x), std::move(y));
        vectors.push_back(TaskVector{std::move(w)});
    }
    return GeneratedTasks{dictionary, CodeMatrix(std::move(codes), spec.alpha_star),
                          std::move(vectors), MultitaskDataset(std::move(tasks))};
}

GeneratedTasks generate_environment(const EnvironmentSpec& spec, int num_tasks) {
    spec.validate();
    Rng rng = Rng(spec.seed).child(0);
    Matrix atoms(spec.d, spec.k_star);
    for (int k = 0; k < spec.k_star; ++k) atoms.col(k) = sample_sphere(spec.d, rng);
    // unit vectors may have norm 1 + ulp
    for (int k = 0; k < spec.k_star; ++k) {
        const double n = atoms.col(k).norm();
        if (n > 1.0) atoms.col(k) /= n;
    }
    return generate_tasks(Dictionary(std::move(atoms)), spec, num_tasks, spec.seed);
}

PixelTasks generate_pixel_tasks(const std::vector<Image>& images, int m, Rng& rng) {
    if (images.empty()) throw std::invalid_argument("generate_pixel_tasks: no images");
    const auto h = images.front().rows();
    const auto w = images.front().cols();
    const auto n_pixels = h * w;
    if (m < 1 || m > n_pixels) {
        throw std::invalid_argument("generate_pixel_tasks: m = " + std::to_string(m) +
                                    " must lie in [1, " + std::to_string(n_pixels) + "]");
    }
    std::vector<TaskData> tasks;
    std::vector<Vector> full_labels;
    std::vector<std::vector<Eigen::Index>> observed;
    for (std::size_t n = 0; n < images.size(); ++n) {
        const Image& img = images[n];
        if (img.rows() != h || img.cols() != w) {
            throw std::invalid_argument("image " + std::to_string(n) + " has a different size");
        }
        Vector labels_all(n_pixels);
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < w; ++c) labels_all[r * w + c] = img(r, c);
        }
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_pixels));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        for (int j = 0; j < m; ++j) {
            const auto pick =
                j + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n_pixels - j)));
            std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
        }
        idx.resize(static_cast<std::size_t>(m));
        Matrix x = Matrix::Zero(m, n_pixels);
        Vector y(m);
        for (int i = 0; i < m; ++i) {
            x(i, idx[static_cast<std::size_t>(i)]) = 1.0;
            y[i] = labels_all[idx[static_cast<std::size_t>(i)]];
        }
        tasks.emplace_back(std::move(x), std::move(y));
        full_labels.push_back(std::move(labels_all));
        observed.push_back(std::move(idx));
    }
    return PixelTasks{MultitaskDataset(std::move(tasks)), std::move(full_labels),
                      std::move(observed), h, w};
}

namespace {

std::string next_token(std::istream& in) {
    std::string tok;
    while (in >> tok) {
        if (tok.front() == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return tok;
    }
    throw std::runtime_error("truncated PGM header");
}

Image read_pgm(std::istream& in, const std::string& path) {
    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5") throw std::runtime_error(path + ": not a P2/P5 PGM");
    const int width = std::stoi(next_token(in));
    const int height = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (width < 1 || height < 1 || maxval < 1 || maxval > 255) {
        throw std::runtime_error(path + ": unsupported PGM geometry or maxval");
    }
    Image img(height, width);
    if (magic == "P2") {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) img(r, c) = std::stoi(next_token(in)) / double(maxval);
        }
    } else {
        in.get();  // single whitespace after maxval
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const int byte = in.get();
                if (byte == EOF) throw std::runtime_error(path + ": truncated PGM data");
                img(r, c) = byte / double(maxval);
            }
        }
    }
    return img;
}

Image read_csv_image(std::istream& in, const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error(path + ": ragged CSV image");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty CSV image");
    Image img(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index r = 0; r < img.rows(); ++r) {
        for (Eigen::Index c = 0; c < img.cols(); ++c) {
            img(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    // 8-bit gray levels unless the file is already in [0, 1]
    if (img.maxCoeff() > 1.0) img /= 255.0;
    if (img.minCoeff() < 0.0 || img.maxCoeff() > 1.0) {
        throw std::runtime_error(path + ": CSV image values outside [0, 255]");
    }
    return img;
}

}  // namespace

Image read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image " + path);
    const bool is_csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
    return is_csv ? read_csv_image(in, path) : read_pgm(in, path);
}

void write_pgm(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image " + path);
    out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) {
            const double v = std::clamp(image(r, c), 0.0, 1.0);
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
}

}  // namespace sparsetask
