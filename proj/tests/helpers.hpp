#ifndef FLEETSIM_TEST_HELPERS_HPP
#define FLEETSIM_TEST_HELPERS_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fleetsim/error.hpp"

namespace testutil {

// Runs fn and records whether it raised a fleetsim::Error, of which kind,
// and with what message.
struct CaughtError {
    bool caught = false;
    int kind = 0;
    std::string message;

    bool contains(const std::string& needle) const {
        return message.find(needle) != std::string::npos;
    }
};

template <typename Fn>
CaughtError capture_error(Fn&& fn) {
    CaughtError r;
    try {
        fn();
    } catch (const fleetsim::Error& e) {
        r.caught = true;
        r.kind = int(e.kind());
        r.message = e.what();
    }
    return r;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        std::random_device rd;
        std::uint64_t tag = (std::uint64_t(rd()) << 32) ^ std::uint64_t(rd());
        tag ^= counter.fetch_add(1) * 0x9e3779b97f4a7c15ULL;
        std::ostringstream name;
        name << "fleetsim_test_" << std::hex << tag;
        path_ = std::filesystem::temp_directory_path() / name.str();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace testutil

#endif
