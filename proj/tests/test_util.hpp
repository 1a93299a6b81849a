#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>

namespace testutil {

// Scratch directory unique to this process + instance, removed on scope exit.
class TempDir {
  public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("readlm-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path file(const std::string& name) const { return dir_ / name; }

  private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// True iff fn() throws E and the message mentions `needle`.
template <typename E, typename Fn>
bool throws_with(Fn&& fn, std::string_view needle) {
    try {
        fn();
    } catch (const E& e) {
        return std::string_view(e.what()).find(needle) != std::string_view::npos;
    } catch (...) {
        return false;
    }
    return false;
}

}  // namespace testutil
