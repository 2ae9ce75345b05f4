#include "denim/recipes/vm.hpp"

#include <limits>

namespace denim::recipes {

const char* to_string(VmStatus status) {
    switch (status) {
        case VmStatus::Ready: return "READY";
        case VmStatus::Sleeping: return "SLEEPING";
        case VmStatus::Waiting: return "SUSPENDED";
        case VmStatus::Halted: return "HALTED";
        case VmStatus::Killed: return "KILLED";
    }
    return "?";
}

const char* to_string(KillReason reason) {
    switch (reason) {
        case KillReason::None: return "none";
        case KillReason::Budget: return "instruction budget exceeded";
        case KillReason::StackOverflow: return "stack overflow";
        case KillReason::StackUnderflow: return "stack underflow";
        case KillReason::DivideByZero: return "divide by zero";
        case KillReason::Malformed: return "malformed bytecode";
        case KillReason::Reset: return "reset by newer recipe";
    }
    return "?";
}

Vm::Vm(Bytes code, VmLimits limits) : code_(std::move(code)), limits_(limits) {
    stack_.reserve(limits_.max_stack);
    if (verify(code_)) {
        status_ = VmStatus::Killed;
        reason_ = KillReason::Malformed;
    }
}

void Vm::kill(KillReason reason) {
    if (status_ == VmStatus::Halted || status_ == VmStatus::Killed) return;
    status_ = VmStatus::Killed;
    reason_ = reason;
}

VmYield Vm::finish(VmStatus status, KillReason reason) {
    status_ = status;
    reason_ = reason;
    return {status, 0, 0, reason};
}

bool Vm::push(std::int32_t v) {
    if (stack_.size() >= limits_.max_stack) return false;
    stack_.push_back(v);
    return true;
}

bool Vm::pop(std::int32_t& v) {
    if (stack_.empty()) return false;
    v = stack_.back();
    stack_.pop_back();
    return true;
}

namespace {

std::int32_t wrap(std::int64_t v) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(v)); }

std::int32_t read_i32(const std::uint8_t* p) {
    return static_cast<std::int32_t>(std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                                     (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24));
}

}  // namespace

VmYield Vm::run(VmHost& host) {
    if (status_ == VmStatus::Halted || status_ == VmStatus::Killed) return {status_, 0, 0, reason_};
    status_ = VmStatus::Ready;

#define DENIM_POP(var)                                                       \
    std::int32_t var;                                                        \
    if (!pop(var)) return finish(VmStatus::Killed, KillReason::StackUnderflow)
#define DENIM_PUSH(expr)                                                   \
    if (!push(expr)) return finish(VmStatus::Killed, KillReason::StackOverflow)

    for (;;) {
        if (pc_ >= code_.size()) return finish(VmStatus::Halted);
        if (executed_ >= limits_.instruction_budget) return finish(VmStatus::Killed, KillReason::Budget);
        ++executed_;

        const auto op = static_cast<Op>(code_[pc_]);
        const std::uint8_t* arg = code_.data() + pc_ + 1;
        pc_ += 1 + *operand_size(code_[pc_]);

        switch (op) {
            case Op::Halt:
                return finish(VmStatus::Halted);
            case Op::Push:
                DENIM_PUSH(read_i32(arg));
                break;
            case Op::Pop: {
                DENIM_POP(v);
                (void)v;
                break;
            }
            case Op::Load:
                DENIM_PUSH(locals_[arg[0]]);
                break;
            case Op::Store: {
                DENIM_POP(v);
                locals_[arg[0]] = v;
                break;
            }
            case Op::Neg: {
                DENIM_POP(v);
                DENIM_PUSH(wrap(-static_cast<std::int64_t>(v)));
                break;
            }
            case Op::Not: {
                DENIM_POP(v);
                DENIM_PUSH(v == 0 ? 1 : 0);
                break;
            }
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
            case Op::Mod:
            case Op::Eq:
            case Op::Ne:
            case Op::Lt:
            case Op::Le:
            case Op::Gt:
            case Op::Ge: {
                DENIM_POP(rhs);
                DENIM_POP(lhs);
                const std::int64_t a = lhs, b = rhs;
                std::int32_t r = 0;
                switch (op) {
                    case Op::Add: r = wrap(a + b); break;
                    case Op::Sub: r = wrap(a - b); break;
                    case Op::Mul: r = wrap(a * b); break;
                    case Op::Div:
                        if (b == 0) return finish(VmStatus::Killed, KillReason::DivideByZero);
                        r = wrap(a / b);
                        break;
                    case Op::Mod:
                        if (b == 0) return finish(VmStatus::Killed, KillReason::DivideByZero);
                        r = wrap(a % b);
                        break;
                    case Op::Eq: r = a == b; break;
                    case Op::Ne: r = a != b; break;
                    case Op::Lt: r = a < b; break;
                    case Op::Le: r = a <= b; break;
                    case Op::Gt: r = a > b; break;
                    case Op::Ge: r = a >= b; break;
                    default: break;
                }
                DENIM_PUSH(r);
                break;
            }
            case Op::Jmp:
                pc_ = std::size_t{arg[0]} | (std::size_t{arg[1]} << 8);
                break;
            case Op::Jz: {
                DENIM_POP(cond);
                if (cond == 0) pc_ = std::size_t{arg[0]} | (std::size_t{arg[1]} << 8);
                break;
            }
            case Op::Call: {
                switch (static_cast<Builtin>(arg[0])) {
                    case Builtin::Wait: {
                        DENIM_POP(event);
                        DENIM_PUSH(0);
                        status_ = VmStatus::Waiting;
                        return {VmStatus::Waiting, 0, event, KillReason::None};
                    }
                    case Builtin::Sleep:
                    case Builtin::Usleep: {
                        DENIM_POP(amount);
                        DENIM_PUSH(0);
                        const SimTime scale = static_cast<Builtin>(arg[0]) == Builtin::Sleep ? 1000 : 1;
                        status_ = VmStatus::Sleeping;
                        return {VmStatus::Sleeping, amount > 0 ? amount * scale : 0, 0, KillReason::None};
                    }
                    case Builtin::Send: {
                        DENIM_POP(count);
                        host.send(count);
                        DENIM_PUSH(0);
                        break;
                    }
                    case Builtin::Gettime:
                        DENIM_PUSH(host.gettime());
                        break;
                    case Builtin::LastKbTime:
                        DENIM_PUSH(host.last_kb_time());
                        break;
                    case Builtin::Rnd: {
                        DENIM_POP(hi);
                        DENIM_POP(lo);
                        DENIM_PUSH(host.rnd(lo, hi));
                        break;
                    }
                    case Builtin::Store: {
                        DENIM_POP(value);
                        DENIM_POP(reg);
                        host.store(reg, value);
                        DENIM_PUSH(0);
                        break;
                    }
                    case Builtin::Load: {
                        DENIM_POP(reg);
                        DENIM_PUSH(host.load(reg));
                        break;
                    }
                    case Builtin::Reset:
                        host.reset();
                        DENIM_PUSH(0);
                        break;
                }
                break;
            }
        }
    }
#undef DENIM_POP
#undef DENIM_PUSH
}

}  // namespace denim::recipes
