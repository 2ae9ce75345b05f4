#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "denim/recipes/bytecode.hpp"

namespace denim::recipes {

/// Side effects a recipe may request from the device it runs on. Every call
/// is scoped to the (host, owner) pair the recipe belongs to.
class VmHost {
public:
    virtual ~VmHost() = default;

    /// Seconds since simulated midnight.
    virtual std::int32_t gettime() = 0;
    /// gettime() value of the host's last key press.
    virtual std::int32_t last_kb_time() = 0;
    /// Uniform on [lo, hi].
    virtual std::int32_t rnd(std::int32_t lo, std::int32_t hi) = 0;
    /// Host sends `count` regular messages to the recipe's owner.
    virtual void send(std::int32_t count) = 0;
    virtual std::int32_t load(std::int32_t reg) = 0;
    virtual void store(std::int32_t reg, std::int32_t value) = 0;
    /// Terminates the owner's other running recipes on this host.
    virtual void reset() = 0;
};

struct VmLimits {
    std::size_t max_stack = 64;
    std::uint64_t instruction_budget = 100'000;
};

enum class VmStatus { Ready, Sleeping, Waiting, Halted, Killed };

enum class KillReason {
    None,
    Budget,
    StackOverflow,
    StackUnderflow,
    DivideByZero,
    Malformed,
    Reset,
};

const char* to_string(VmStatus status);
const char* to_string(KillReason reason);

/// Why run() returned.
struct VmYield {
    VmStatus status = VmStatus::Ready;
    SimTime sleep_ms = 0;      // Sleeping
    std::int32_t event = 0;    // Waiting
    KillReason reason = KillReason::None;
};

/// Stack machine for one recipe instance. run() executes until the recipe
/// suspends (sleep/usleep/wait), halts, or is killed; the caller resumes it by
/// calling run() again. Arithmetic wraps at 32 bits.
class Vm {
public:
    explicit Vm(Bytes code, VmLimits limits = {});

    VmYield run(VmHost& host);
    void kill(KillReason reason);

    VmStatus status() const noexcept { return status_; }
    KillReason kill_reason() const noexcept { return reason_; }
    std::uint64_t instructions_executed() const noexcept { return executed_; }
    std::int32_t local(std::uint8_t slot) const noexcept { return locals_[slot]; }

private:
    VmYield finish(VmStatus status, KillReason reason = KillReason::None);
    bool push(std::int32_t v);
    bool pop(std::int32_t& v);

    Bytes code_;
    VmLimits limits_;
    std::size_t pc_ = 0;
    std::vector<std::int32_t> stack_;
    std::array<std::int32_t, kMaxLocals> locals_{};
    std::uint64_t executed_ = 0;
    VmStatus status_ = VmStatus::Ready;
    KillReason reason_ = KillReason::None;
};

}  // namespace denim::recipes
