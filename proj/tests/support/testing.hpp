#pragma once
// torch's c10 logging shim defines CHECK/CHECK_EQ-style macros without
// guards.  Pull torch in first, drop those names, and include doctest last
// so its assertion macros are the ones test code actually expands to.
// (Later torch includes are no-ops thanks to include guards.)
#include <torch/torch.h>

#undef CHECK
#undef CHECK_EQ
#undef CHECK_NE
#undef CHECK_LE
#undef CHECK_LT
#undef CHECK_GE
#undef CHECK_GT
#undef DCHECK
#undef DCHECK_EQ
#undef DCHECK_NE
#undef DCHECK_LE
#undef DCHECK_LT
#undef DCHECK_GE
#undef DCHECK_GT

#include <doctest.h>

#include <set>
#include <sstream>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>

// Training cases allocate multi-gigabyte autograd state. glibc retains
// freed large blocks once it auto-raises its internal mmap threshold, so
// consecutive heavy cases stack their peaks and trip the OOM killer on a
// small machine. Pin the threshold so big buffers go back to the kernel on
// free, and trim the heap between test cases.
namespace glyphgan::testing {

struct HeapDiscipline : doctest::IReporter {
    explicit HeapDiscipline(const doctest::ContextOptions&) {
        mallopt(M_MMAP_THRESHOLD, 1 << 20);
    }
    void test_case_end(const doctest::CurrentTestCaseStats&) override {
        malloc_trim(0);
    }
    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats&) override {}
    void test_case_start(const doctest::TestCaseData&) override {}
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_exception(const doctest::TestCaseException&) override {}
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData&) override {}
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

}  // namespace glyphgan::testing

REGISTER_LISTENER("heap-discipline", 0, glyphgan::testing::HeapDiscipline);
#endif

// c10 ships a generic operator<< for containers, which doctest would pick
// up when stringifying failed comparisons; streaming char32_t itself is
// deleted in C++20, so give doctest explicit printers for code points.
namespace doctest {

template <>
struct StringMaker<std::set<char32_t>> {
    static String convert(const std::set<char32_t>& s) {
        std::ostringstream os;
        os << "{";
        for (char32_t c : s) os << " U+" << std::hex << uint32_t(c);
        os << " }";
        return os.str().c_str();
    }
};

template <>
struct StringMaker<std::vector<char32_t>> {
    static String convert(const std::vector<char32_t>& v) {
        std::ostringstream os;
        os << "[";
        for (char32_t c : v) os << " U+" << std::hex << uint32_t(c);
        os << " ]";
        return os.str().c_str();
    }
};

}  // namespace doctest
