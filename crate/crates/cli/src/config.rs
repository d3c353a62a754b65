//! `--config` files. A TOML file holds one table per subcommand whose keys
//! are the long flag names; flags given on the command line win.
//!
//! ```toml
//! [emit]
//! mode = "it-mtl"
//! tasks = "all"
//! seed = 7
//! ```

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{usage, Result};

#[derive(Debug, Default)]
pub struct Config {
    sections: Map<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        let mut sections = Map::new();
        for (name, value) in table {
            let Value::Object(section) = serde_json::to_value(value)? else {
                return Err(usage(format!("config key `{name}` must be a table named after a subcommand")));
            };
            let section = section
                .into_iter()
                .map(|(k, v)| (k.replace('-', "_"), v))
                .collect();
            sections.insert(name, Value::Object(section));
        }
        Ok(Config { sections })
    }

    /// Overlays the flags that were actually given onto the `[command]`
    /// table. Unset options, `false` switches and empty lists do not
    /// override the file.
    pub fn resolve<T: Serialize + DeserializeOwned>(&mut self, command: &str, flags: &T) -> Result<T> {
        let mut merged = match self.sections.remove(command) {
            Some(Value::Object(m)) => m,
            _ => Map::new(),
        };
        let Value::Object(given) = serde_json::to_value(flags)? else {
            unreachable!("argument structs serialize to objects")
        };
        for (k, v) in given {
            let unset = match &v {
                Value::Null | Value::Bool(false) => true,
                Value::Array(a) => a.is_empty(),
                _ => false,
            };
            if !unset {
                merged.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("[{command}] config: {e}")))
    }

    pub fn check_unused(&self) -> Result<()> {
        match self.sections.keys().find(|k| !crate::SUBCOMMANDS.contains(&k.as_str())) {
            Some(name) => Err(usage(format!("config table [{name}] is not a subcommand"))),
            None => Ok(()),
        }
    }
}
