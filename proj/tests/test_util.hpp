#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "tierforge/frame.hpp"
#include "tierforge/rng.hpp"

namespace testutil {

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tierforge_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path_.string() : (path_ / rel).string();
    }

private:
    std::filesystem::path path_;
};

inline tierforge::Frame random_frame(int w, int h, int c, std::uint64_t seed, double lo = 0.0,
                                     double hi = 1.0) {
    tierforge::Frame f(w, h, c);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        f.data[i] = tierforge::rng::uniform_range(seed, i, lo, hi);
    return f;
}

inline double max_abs_diff(const tierforge::Frame& a, const tierforge::Frame& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

inline std::vector<char> slurp_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Byte-for-byte equality of two directory trees.
inline bool trees_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(a) || !fs::is_directory(b)) return false;
    auto collect = [](const fs::path& root) {
        std::vector<fs::path> rel;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), root));
        std::sort(rel.begin(), rel.end());
        return rel;
    };
    const auto rel_a = collect(a);
    if (rel_a != collect(b)) return false;
    for (const auto& r : rel_a)
        if (slurp_file(a / r) != slurp_file(b / r)) return false;
    return true;
}

} // namespace testutil
