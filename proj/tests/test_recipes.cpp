#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "recipe_oracle.hpp"

using namespace denim;
using namespace denim::recipes;

namespace {

std::string read_recipe(const char* name) {
    std::ifstream in(std::string(DENIM_SOURCE_DIR) + "/recipes/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Errc compile_error_code(const std::string& src) {
    try {
        compile_source(src);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a compile error for: " << src);
    return Errc::ValidationError;
}

struct Outcome {
    VmStatus status;
    KillReason reason;
    std::uint64_t executed;
};

Outcome run_source(const std::string& src, recipe_oracle::LogHost& host, VmLimits limits = {}) {
    Vm vm(compile_source(src), limits);
    const auto status = recipe_oracle::run_vm(vm, host);
    return {status, vm.kill_reason(), vm.instructions_executed()};
}

}  // namespace

TEST_CASE("compiled code matches the AST interpreter on generated programs") {
    recipe_oracle::Generator gen(20240601);
    int compared = 0, oversize = 0, div_zero = 0;
    for (int i = 0; i < 2000; ++i) {
        const std::string src = gen.program();
        INFO(src);
        CompileResult compiled;
        try {
            compiled = compile(parse(src));
        } catch (const Error& e) {
            REQUIRE(e.code() == Errc::SizeExceeded);
            ++oversize;
            continue;
        }
        REQUIRE_FALSE(verify(compiled.code).has_value());

        recipe_oracle::LogHost ref_host;
        recipe_oracle::Interpreter interp(ref_host);
        const Program prog = parse(src);
        const bool completed = interp.run(prog);

        recipe_oracle::LogHost vm_host;
        Vm vm(compiled.code);
        const auto status = recipe_oracle::run_vm(vm, vm_host);

        CHECK(vm_host.log == ref_host.log);
        if (completed) {
            CHECK(status == VmStatus::Halted);
            // Flat scoping: a declaration that never ran leaves its slot at 0.
            for (const auto& [name, slot] : compiled.locals) {
                auto it = interp.vars.find(name);
                CHECK(vm.local(slot) == (it == interp.vars.end() ? 0 : it->second));
            }
        } else {
            ++div_zero;
            CHECK(status == VmStatus::Killed);
            CHECK(vm.kill_reason() == KillReason::DivideByZero);
        }
        ++compared;
    }
    MESSAGE("compared " << compared << ", oversize " << oversize << ", divide by zero " << div_zero);
    CHECK(compared > 1500);
}

TEST_CASE("shipped recipes compile within the chunk budget") {
    for (const char* name : {"on_active.rcp", "at_midnight.rcp", "delayed_reply.rcp", "delayed_reply_fixed.rcp"}) {
        INFO(name);
        const auto code = compile_source(read_recipe(name));
        CHECK(code.size() <= kMaxBytecodeSize);
        CHECK_FALSE(verify(code).has_value());
    }
}

TEST_CASE("a statement may end at a line break without ';'") {
    CHECK_NOTHROW(compile_source("int t = gettime()\nsend(t);"));
    CHECK(compile_error_code("int t = gettime() send(t);") == Errc::SyntaxError);
}

TEST_CASE("compile errors") {
    CHECK(compile_error_code("frobnicate(1);") == Errc::UnknownBuiltin);
    CHECK(compile_error_code("send(1, 2);") == Errc::SyntaxError);
    CHECK(compile_error_code("x = 1;") == Errc::SyntaxError);
    CHECK(compile_error_code("int x = ;") == Errc::SyntaxError);
    CHECK(compile_error_code("while (1) { send(1);") == Errc::SyntaxError);

    std::string big;
    for (int i = 0; i < 1000; ++i) big += "send(1);\n";
    CHECK(big.size() > 8000);
    CHECK(compile_error_code(big) == Errc::SizeExceeded);

    try {
        compile_source("int a = 1;\nint b = a +;\n");
        FAIL("expected syntax error");
    } catch (const CompileError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() == 12);
    }
}

TEST_CASE("infinite loop is stopped by the instruction budget") {
    recipe_oracle::LogHost host;
    const auto out = run_source("while (1) {}", host);
    CHECK(out.status == VmStatus::Killed);
    CHECK(out.reason == KillReason::Budget);
    CHECK(out.executed == 100000);
}

TEST_CASE("budget counts across suspensions") {
    recipe_oracle::LogHost host;
    const auto out = run_source("while (1) { usleep(1); }", host, VmLimits{64, 1000});
    CHECK(out.reason == KillReason::Budget);
    CHECK(out.executed == 1000);
}

TEST_CASE("deep expressions overflow the stack") {
    std::string src = "int x = ";
    for (int i = 0; i < 70; ++i) src += "(1 + ";
    src += "1";
    for (int i = 0; i < 70; ++i) src += ")";
    src += ";";
    recipe_oracle::LogHost host;
    const auto out = run_source(src, host);
    CHECK(out.status == VmStatus::Killed);
    CHECK(out.reason == KillReason::StackOverflow);

    recipe_oracle::LogHost host2;
    CHECK(run_source("int x = 1 / 0;", host2).reason == KillReason::DivideByZero);
}

TEST_CASE("arithmetic wraps at 32 bits") {
    recipe_oracle::LogHost host;
    Vm vm(compile_source("int a = 2147483647 + 1; int b = -2147483647 - 2; int c = 65536 * 65536;"));
    recipe_oracle::run_vm(vm, host);
    CHECK(vm.local(0) == INT32_MIN);
    CHECK(vm.local(1) == INT32_MAX);
    CHECK(vm.local(2) == 0);
}

TEST_CASE("malformed bytecode is rejected") {
    CHECK(verify(Bytes{0x01, 0x00}).has_value());        // truncated PUSH
    CHECK(verify(Bytes{0x7F}).has_value());              // unknown opcode
    CHECK(verify(Bytes{0x12, 0x50, 0x00}).has_value());  // jump past the end
    CHECK(verify(Bytes{0x12, 0x01, 0x00, 0x00}).has_value());  // jump into an operand
    CHECK(verify(Bytes{0x14, 0x20}).has_value());        // unknown builtin
    CHECK(verify(Bytes(447, 0x00)).has_value());         // over budget

    recipe_oracle::LogHost host;
    Vm vm(Bytes{0x7F});
    CHECK(vm.run(host).status == VmStatus::Killed);
    CHECK(vm.kill_reason() == KillReason::Malformed);

    CHECK_THROWS_AS(from_file(Bytes{'X', 'X', 'X', 'X', 1, 0}), Error);
    CHECK_THROWS_AS(from_file(Bytes{'D', 'N', 'R', 'C', 9, 0}), Error);
}

TEST_CASE("file round trip and disassembly jump targets stay in bounds") {
    const auto code = compile_source(read_recipe("delayed_reply.rcp"));
    CHECK(from_file(to_file(code)) == code);

    const std::string text = disassemble(code);
    std::set<std::size_t> offsets;
    std::vector<std::size_t> targets;
    std::istringstream lines(text);
    std::string line;
    const std::regex row(R"(^(\d{4})  (\w+)(?: (\S+))?.*$)");
    while (std::getline(lines, line)) {
        std::smatch m;
        REQUIRE(std::regex_match(line, m, row));
        offsets.insert(std::stoul(m[1]));
        if (m[2] == "JMP" || m[2] == "JZ") targets.push_back(std::stoul(m[3]));
    }
    CHECK_FALSE(targets.empty());
    for (auto t : targets) CHECK(offsets.contains(t));
}

TEST_CASE("builtin effects reach the host in program order") {
    recipe_oracle::LogHost host;
    run_source("store(5, load(5) + 2); send(rnd(1, 4)); reset(); wait(APP_ACTIVE); sleep(2); usleep(-3);", host);
    const std::vector<std::string> want{"load 5", "store 5 2", "rnd 1 4", "send 2", "reset",
                                        "wait 1", "sleep 2000", "sleep 0"};
    CHECK(host.log == want);
}
