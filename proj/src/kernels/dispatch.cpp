#include "dyndr/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace dyndr::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable &avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
	__builtin_cpu_init();
	return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
	return false;
#endif
}

const KernelTable *initial_table() {
	if (const KernelTable *t = avx2_table()) {
		return t;
	}
	return &scalar_table();
}

std::atomic<const KernelTable *> &current() {
	static std::atomic<const KernelTable *> table{initial_table()};
	return table;
}

} // namespace

const KernelTable *avx2_table() {
#if defined(__x86_64__) || defined(_M_X64)
	static const bool supported = cpu_has_avx2();
	return supported ? &avx2_kernel_table() : nullptr;
#else
	return nullptr;
#endif
}

bool backend_available(Backend b) {
	return b == Backend::scalar || avx2_table() != nullptr;
}

Backend best_backend() {
	return avx2_table() ? Backend::avx2 : Backend::scalar;
}

const KernelTable &active() {
	return *current().load(std::memory_order_acquire);
}

void set_backend(Backend b) {
	if (b == Backend::scalar) {
		current().store(&scalar_table(), std::memory_order_release);
		return;
	}
	const KernelTable *t = avx2_table();
	if (!t) {
		throw std::invalid_argument("avx2 kernels are not available on this machine");
	}
	current().store(t, std::memory_order_release);
}

std::string_view backend_name(Backend b) {
	return b == Backend::avx2 ? "avx2" : "scalar";
}

Backend parse_backend(std::string_view name) {
	if (name == "scalar") {
		return Backend::scalar;
	}
	if (name == "avx2") {
		return Backend::avx2;
	}
	if (name == "auto") {
		return best_backend();
	}
	throw std::invalid_argument("unknown kernel backend '" + std::string(name) + "' (expected scalar, avx2 or auto)");
}

} // namespace dyndr::kernels
