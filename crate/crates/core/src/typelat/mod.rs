//! Characteristics, prime sets and the lattice of types over the integers.

mod characteristic;
mod ext;
mod primes;
mod primeset;
mod tailed;
mod types;

pub use characteristic::Characteristic;
pub use ext::ExtValue;
pub use primes::{index_of_prime, nth_prime, prime_at, prime_position};
pub use primeset::PrimeSet;
pub use tailed::Tailed;
pub use types::TypeHandle;

pub fn char_value(chi: &Characteristic, n: i64) -> ExtValue {
    chi.value(n)
}

pub fn support_sets(chi: &Characteristic) -> (PrimeSet, PrimeSet, PrimeSet) {
    chi.support_sets()
}

pub fn char_equivalent(chi: &Characteristic, theta: &Characteristic) -> bool {
    chi.equivalent(theta)
}

pub fn type_le(tau: &TypeHandle, upsilon: &TypeHandle) -> bool {
    tau.le(upsilon)
}

pub fn type_inf(tau: &TypeHandle, upsilon: &TypeHandle) -> TypeHandle {
    tau.inf(upsilon)
}

pub fn type_sup(tau: &TypeHandle, upsilon: &TypeHandle) -> TypeHandle {
    tau.sup(upsilon)
}

pub fn is_idempotent(tau: &TypeHandle) -> bool {
    tau.is_idempotent()
}
