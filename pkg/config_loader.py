from pydantic_settings import BaseSettings
from pydantic import Field, field_validator
from typing import Optional
import logging
import math
import os

_FORMATS = ("json", "csv", "pretty")
_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseSettings):
    """應用程式設定，支援環境變數 (QWALK_ 前綴) 和 .env 檔案"""

    # === 容許誤差 ===
    tolerance_unitary: float = Field(default=1e-12, description="係數矩陣么正性容許誤差")
    tolerance_state_norm: float = Field(default=1e-10, description="演化中狀態範數漂移上限")
    tolerance_initial_norm: float = Field(default=1e-8, description="初始狀態範數容許誤差")
    tolerance_leakage: float = Field(default=1e-8, description="讀出時偏離輸出軌道的機率上限")
    tolerance_verify: float = Field(default=1e-9, description="電路驗證保真度容許誤差")
    tolerance_period: float = Field(default=1e-6, description="週期判定容許誤差")

    # === 量子漫步設定 ===
    walk_phase: float = Field(default=-math.pi / 4, description="四度頂點係數的相位 φ")

    # === 編譯器設定 ===
    compiler_max_qubits: int = Field(default=10, description="編譯允許的最大量子位元數")
    verify_max_qubits: int = Field(default=6, description="驗證允許的最大量子位元數")
    hadamard_trim_global_phase: bool = Field(default=True, description="Hadamard 結構使用修剪後的 C 區段")
    cnot_length: int = Field(default=1, description="C-NOT 交叉段長度")

    # === 輸出設定 ===
    output_format: str = Field(default="json", description="輸出格式: json, csv 或 pretty")
    log_level: str = Field(default="INFO", description="日誌等級")

    # === 掃描設定 ===
    scan_workers: int = Field(default=1, description="PST 掃描的執行緒數")
    random_seed: Optional[int] = Field(default=None, description="隨機性質測試的種子")

    class Config:
        env_prefix = "QWALK_"
        env_file = ".env"
        env_file_encoding = 'utf-8'
        case_sensitive = False
        extra = "ignore"  # 忽略額外的環境變數

    @field_validator(
        'tolerance_unitary', 'tolerance_state_norm', 'tolerance_initial_norm',
        'tolerance_leakage', 'tolerance_verify', 'tolerance_period',
    )
    @classmethod
    def positive_tolerance(cls, v):
        if not v > 0:
            raise ValueError(f"tolerance must be positive, got {v}")
        return v

    @field_validator('output_format')
    @classmethod
    def known_format(cls, v):
        v = v.lower()
        if v not in _FORMATS:
            raise ValueError(f"output format must be one of {_FORMATS}, got {v!r}")
        return v

    @field_validator('log_level')
    @classmethod
    def known_level(cls, v):
        v = v.upper()
        if v not in _LOG_LEVELS:
            raise ValueError(f"unknown log level {v!r}")
        return v

    @field_validator('compiler_max_qubits', 'verify_max_qubits', 'cnot_length', 'scan_workers')
    @classmethod
    def at_least_one(cls, v):
        if v < 1:
            raise ValueError(f"value must be at least 1, got {v}")
        return v

    def to_legacy_config(self) -> dict:
        """轉換為分區段的配置字典"""
        return {
            'tolerances': {
                'unitary': self.tolerance_unitary,
                'state_norm': self.tolerance_state_norm,
                'initial_norm': self.tolerance_initial_norm,
                'leakage': self.tolerance_leakage,
                'verify': self.tolerance_verify,
                'period': self.tolerance_period,
            },
            'walk': {
                'phase': self.walk_phase,
            },
            'compiler': {
                'max_qubits': self.compiler_max_qubits,
                'verify_max_qubits': self.verify_max_qubits,
                'hadamard_trim_global_phase': self.hadamard_trim_global_phase,
                'cnot_length': self.cnot_length,
            },
            'output': {
                'format': self.output_format,
                'log_level': self.log_level,
            },
            'scan': {
                'workers': self.scan_workers,
                'random_seed': self.random_seed,
            },
        }


# 全域設定實例
_settings = None


def _get_settings() -> Settings:
    """獲取設定實例（內部函數，單例模式）"""
    global _settings
    if _settings is None:
        _settings = Settings()
        logging.debug("Settings loaded from environment variables")
    return _settings


def get_settings() -> Settings:
    return _get_settings()


def reset_settings() -> None:
    """清除快取的設定 (測試用)"""
    global _settings
    _settings = None


def load_config() -> dict:
    """
    載入完整配置

    合併以下來源：
    1. 環境變數 / .env (優先級最高)
    2. configs/config.yaml (僅補上環境變數未設定的欄位)

    Returns:
        dict: 分區段的配置字典
    """
    import yaml

    settings = _get_settings()
    config = settings.to_legacy_config()
    from_env = settings.model_fields_set

    # 尋找 config.yaml 文件，支援從不同目錄運行
    config_paths = [
        'configs/config.yaml',  # 從專案根目錄運行
        '../configs/config.yaml',  # 從 scripts/ 或 test/ 目錄運行
        os.path.join(os.path.dirname(__file__), 'configs/config.yaml'),  # 絕對路徑
    ]

    config_file_found = False
    for config_path in config_paths:
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                yaml_config = yaml.safe_load(f)
        except FileNotFoundError:
            continue  # 嘗試下一個路徑
        except Exception as e:
            logging.error(f"Error reading {config_path}: {e}")
            continue
        if not yaml_config:
            continue

        config_file_found = True
        overrides = {}
        for section, values in yaml_config.items():
            if section not in config or not isinstance(values, dict):
                logging.warning(f"Ignoring unknown config section '{section}' in {config_path}")
                continue
            for key, value in values.items():
                field = _field_name(section, key)
                if field not in Settings.model_fields:
                    logging.warning(f"Ignoring unknown config key '{section}.{key}'")
                    continue
                # 只有當環境變數中沒有設定時才使用 YAML 中的值
                if field not in from_env:
                    overrides[field] = value

        if overrides:
            # 透過 Settings 再驗證一次 YAML 的值
            merged = Settings.model_validate({**settings.model_dump(), **overrides})
            config = merged.to_legacy_config()
        break  # 找到配置文件就停止搜尋

    if not config_file_found:
        logging.debug("No config.yaml file found, using environment variables only")

    return config


_SECTION_PREFIX = {
    'tolerances': 'tolerance_',
    'walk': 'walk_',
    'compiler': 'compiler_',
    'output': 'output_',
    'scan': 'scan_',
}

# 欄位名稱不符合「區段前綴 + 鍵」規則的例外
_FIELD_ALIASES = {
    ('compiler', 'verify_max_qubits'): 'verify_max_qubits',
    ('compiler', 'hadamard_trim_global_phase'): 'hadamard_trim_global_phase',
    ('compiler', 'cnot_length'): 'cnot_length',
    ('output', 'log_level'): 'log_level',
    ('scan', 'random_seed'): 'random_seed',
}


def _field_name(section: str, key: str) -> str:
    return _FIELD_ALIASES.get((section, key), f"{_SECTION_PREFIX.get(section, '')}{key}")
