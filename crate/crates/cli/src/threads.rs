use crate::error::CliError;

pub const THREADS_VAR: &str = "GEOFLOW_THREADS";

/// Thread cap from `GEOFLOW_THREADS`, if set.
pub fn requested() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Usage(format!("{THREADS_VAR}: {e}"))),
        Ok(raw) if raw.trim().is_empty() => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_VAR} must be a positive integer (got `{raw}`)"
            ))),
        },
    }
}

/// Sizes the global rayon pool from `GEOFLOW_THREADS`.
pub fn configure() -> Result<(), CliError> {
    if let Some(n) = requested()? {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
