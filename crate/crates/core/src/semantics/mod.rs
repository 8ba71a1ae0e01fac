//! Execution semantics: elaboration of automata into finite transducers,
//! completion of untriggered inputs, single steps and synchronous
//! simulation of whole architectures.

mod bundle;
mod eval;
mod simulate;
mod transducer;

pub use bundle::{BundleError, StreamBundle};
pub use eval::{clamp, eval, EvalError};
pub use simulate::{simulate, SimError, Simulation};
pub use transducer::{
    complete, elaborate, step, Code, CompletionMode, Config, ConfigId, Interface, Policy, PortSig, SemanticsError,
    Step, StepError, Successors, Transducer, EPSILON,
};
