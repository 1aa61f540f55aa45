use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    NotPrime(u64),
    /// Moduli below 5 carry no non-principal primitive character worth studying here.
    ModulusTooSmall(u64),
    ModulusTooLarge { q: u64, cap: u64 },
    PrincipalCharacter,
    /// Evaluation at a pole of a meromorphic function.
    Pole(&'static str),
    InvalidParameter(String),
    /// A Dirichlet-polynomial expansion would exceed its support budget.
    SupportBudgetExceeded { needed: usize, cap: usize },
    /// A coefficient or an index left the representable range.
    Overflow(&'static str),
    TwistNotCoprime { h: u64, b: u64, q: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::ModulusTooSmall(q) => write!(f, "modulus {q} is too small (need q >= 5)"),
            Error::ModulusTooLarge { q, cap } => {
                write!(f, "modulus {q} exceeds the table cap {cap}")
            }
            Error::PrincipalCharacter => write!(f, "the principal character is excluded"),
            Error::Pole(what) => write!(f, "pole of {what}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SupportBudgetExceeded { needed, cap } => write!(
                f,
                "expansion needs at least {needed} coefficients, above the cap of {cap}"
            ),
            Error::Overflow(what) => write!(f, "overflow in {what}"),
            Error::TwistNotCoprime { h, b, q } => {
                write!(f, "twist ({h}, {b}) must satisfy (h, b) = (hb, {q}) = 1")
            }
        }
    }
}

impl core::error::Error for Error {}
