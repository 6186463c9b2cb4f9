//! Command-line front end for `quadorder`.

pub mod verify;

use quadorder::Error;

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_resource() {
        3
    } else {
        2
    }
}
