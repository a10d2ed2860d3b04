#pragma once

#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>
#include <string>

namespace test_support {

// scoped environment override, restores the previous value on exit
struct EnvGuard {
    std::string name;
    std::string saved;
    bool had = false;
    EnvGuard(const char* var, const std::string& value) : name(var) {
        const char* old = std::getenv(var);
        if (old) {
            had = true;
            saved = old;
        }
        setenv(var, value.c_str(), 1);
    }
    ~EnvGuard() {
        if (had)
            setenv(name.c_str(), saved.c_str(), 1);
        else
            unsetenv(name.c_str());
    }
    EnvGuard(const EnvGuard&) = delete;
    EnvGuard& operator=(const EnvGuard&) = delete;
};

inline std::string fresh_tmp_dir(const std::string& tag) {
    std::string dir = "/tmp/arsym_test_" + tag + "_" + std::to_string(::getpid());
    ::mkdir(dir.c_str(), 0755);
    return dir;
}

}  // namespace test_support
