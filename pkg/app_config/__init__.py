from .app_config import ConfigError, WorkbenchConfig, settings, use_config

__all__ = ['ConfigError', 'WorkbenchConfig', 'settings', 'use_config']
