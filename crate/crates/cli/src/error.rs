use std::fmt;
use std::process::ExitCode;

use helicoid_core::analysis::AnalysisError;
use helicoid_core::deform::DeformError;
use helicoid_core::expr::ExprError;
use helicoid_core::helicoid::HelicoidError;
use helicoid_core::legendre::LegendreError;
use helicoid_core::numerics::NumericsError;
use serde_json::json;

/// Exit code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Usage,
    Invalid,
    Numeric,
}

impl Class {
    pub fn code(self) -> u8 {
        match self {
            Class::Usage => 2,
            Class::Invalid => 3,
            Class::Numeric => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(class: Class, kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            class,
            kind,
            message: message.into(),
        }
    }

    pub fn invalid(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::new(Class::Invalid, kind, message)
    }

    /// Print the machine-readable form on stderr and return the exit code.
    pub fn report(&self) -> ExitCode {
        // reader went away (`| head`); nothing left to say
        if self.kind == "broken-pipe" {
            return ExitCode::SUCCESS;
        }
        let body = json!({
            "error": {
                "kind": self.kind,
                "class": match self.class {
                    Class::Usage => "usage",
                    Class::Invalid => "validation",
                    Class::Numeric => "numeric",
                },
                "message": self.message,
            }
        });
        eprintln!("{body}");
        ExitCode::from(self.class.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::invalid("broken-pipe", e.to_string());
        }
        CliError::invalid("io", e.to_string())
    }
}

fn expr_kind(e: &ExprError) -> &'static str {
    match e {
        ExprError::Syntax { .. } => "expr-syntax",
        ExprError::UnknownIdentifier { .. } => "expr-unknown-identifier",
        ExprError::Domain { .. } => "expr-domain",
        ExprError::NonSmooth { .. } => "expr-non-smooth",
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        CliError::invalid(expr_kind(&e), e.to_string())
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        let kind = match &e {
            NumericsError::Expr(inner) => return inner.clone().into(),
            NumericsError::InvalidConfig(_) => return CliError::invalid("invalid-config", e.to_string()),
            NumericsError::SeedNotRoot { .. } => "seed-not-root",
            NumericsError::EmptyGrid => "empty-grid",
            NumericsError::GridTooCoarse { .. } => "grid-too-coarse",
        };
        CliError::new(Class::Numeric, kind, e.to_string())
    }
}

impl From<LegendreError> for CliError {
    fn from(e: LegendreError) -> Self {
        let kind = match &e {
            LegendreError::Expr(inner) => return inner.clone().into(),
            LegendreError::Numerics(inner) => return inner.clone().into(),
            LegendreError::InvalidDomain(..) => "invalid-domain",
            LegendreError::NeedsExplicitNu { .. } => "needs-explicit-normal",
            LegendreError::NotUnit { .. } => "normal-not-unit",
            LegendreError::LegendreViolated { .. } => "legendre-violated",
            LegendreError::EllVanishes { .. } => "ell-vanishes",
        };
        CliError::invalid(kind, e.to_string())
    }
}

impl From<HelicoidError> for CliError {
    fn from(e: HelicoidError) -> Self {
        match e {
            HelicoidError::Curve(inner) => inner.into(),
            HelicoidError::Expr(inner) => inner.into(),
            HelicoidError::XiVanishes { .. } => CliError::invalid("xi-vanishes", e.to_string()),
        }
    }
}

impl From<DeformError> for CliError {
    fn from(e: DeformError) -> Self {
        let (class, kind) = match &e {
            DeformError::Expr(inner) => return inner.clone().into(),
            DeformError::Curve(inner) => return inner.clone().into(),
            DeformError::Surface(inner) => return inner.clone().into(),
            DeformError::Numerics(inner) => return inner.clone().into(),
            DeformError::X1Vanishes { .. } => (Class::Invalid, "x1-vanishes"),
            DeformError::XbarVanishes { .. } => (Class::Invalid, "xbar-vanishes"),
            DeformError::YbarVanishes { .. } => (Class::Invalid, "ybar-vanishes"),
            DeformError::Hypothesis(_) => (Class::Invalid, "hypothesis"),
            DeformError::DiscriminantNegative { .. } => (Class::Numeric, "discriminant-negative"),
            DeformError::FocalInfinite { .. } => (Class::Numeric, "focal-infinite"),
        };
        CliError::new(class, kind, e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let (class, kind) = match &e {
            AnalysisError::Expr(inner) => return inner.clone().into(),
            AnalysisError::Numerics(inner) => return inner.clone().into(),
            AnalysisError::NotSingular { .. } => (Class::Invalid, "not-singular"),
            AnalysisError::NotIsolated { .. } => (Class::Invalid, "not-isolated"),
            AnalysisError::OrderExceedsCap { .. } => (Class::Numeric, "order-exceeds-cap"),
            AnalysisError::NeedsPhiOrder { .. } => (Class::Numeric, "needs-phi-order"),
        };
        CliError::new(class, kind, e.to_string())
    }
}
