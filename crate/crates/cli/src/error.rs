use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            CliError::Config(m) => ("config", m),
            CliError::Numerical(m) => ("numerical", m),
        };
        json!({ "error": kind, "message": message, "exit_code": self.exit_code() }).to_string()
    }
}

impl From<sqbo::Error> for CliError {
    fn from(e: sqbo::Error) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}
