#!/usr/bin/env python3
"""
Tests for ConfigManager
"""

import json
import unittest
import tempfile
import os
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from config_manager import ConfigManager
from graphs.common import DistGraphError

class TestConfigManager(unittest.TestCase):
    """Test cases for ConfigManager"""
    
    def setUp(self):
        # Create temporary directory for test config
        self.temp_dir = tempfile.mkdtemp()
        self.config_path = Path(self.temp_dir) / "test_config.yaml"
        self.config_manager = ConfigManager(str(self.config_path))
    
    def tearDown(self):
        # Clean up temporary directory
        import shutil
        shutil.rmtree(self.temp_dir)
    
    def test_create_default_config(self):
        """Test default config creation"""
        config = self.config_manager.load_config()
        
        # Check that default config was created
        self.assertTrue(self.config_path.exists())
        
        # Check for expected keys
        expected_keys = ['graph', 'sampling', 'ext', 'tilde', 'experiments', 'pathology', 'runtime', 'output']
        for key in expected_keys:
            self.assertIn(key, config)
    
    def test_get_nested_value(self):
        """Test nested value retrieval"""
        config = self.config_manager.load_config()
        
        # Test existing nested value
        f_exponent = self.config_manager.get_nested_value(config, 'ext.f_exponent')
        self.assertEqual(f_exponent, 0.6)
        
        # Test non-existing nested value with default
        missing_value = self.config_manager.get_nested_value(config, 'ext.missing', 'default')
        self.assertEqual(missing_value, 'default')
        
        # Test another section
        output_format = self.config_manager.get_nested_value(config, 'output.format')
        self.assertEqual(output_format, 'csv')
    
    def test_update_config(self):
        """Test config updating"""
        # Load initial config
        initial_config = self.config_manager.load_config()
        
        # Update config
        updates = {
            'pathology': {'budget': 500},
            'new_key': 'new_value'
        }
        self.config_manager.update_config(updates)
        
        # Load updated config
        updated_config = self.config_manager.load_config()
        
        # Check updates were applied
        self.assertEqual(updated_config['pathology']['budget'], 500)
        self.assertEqual(updated_config['new_key'], 'new_value')
        
        # Check other values are preserved
        self.assertEqual(updated_config['ext']['f_exponent'], initial_config['ext']['f_exponent'])
    
    def test_partial_settings_fall_back_to_defaults(self):
        """Test missing keys are filled from defaults"""
        self.config_path.write_text("graph:\n  max_vertices: 1000\n", encoding="utf-8")
        config = self.config_manager.load_config()
        self.assertEqual(config['graph']['max_vertices'], 1000)
        self.assertEqual(config['graph']['neighbor_cache_max_n'], 16)
        self.assertEqual(config['sampling']['dense_p_threshold'], 0.05)
    
    def test_load_bare_run_config(self):
        """Test a bare JSON object of options"""
        path = Path(self.temp_dir) / "run.json"
        path.write_text(json.dumps({'pattern': 'k3', 'n': 12}), encoding="utf-8")
        options = self.config_manager.load_run_config(str(path), "1.0.0")
        self.assertEqual(options, {'pattern': 'k3', 'n': 12})
    
    def test_load_result_document(self):
        """Test a previous JSON result used as run config"""
        path = Path(self.temp_dir) / "result.json"
        document = {
            'library_version': '1.0.0', 'master_seed': 42, 'command': 'count mono',
            'config': {'pattern': 'k3', 'n': 8}, 'rows': [], 'summary': {},
        }
        path.write_text(json.dumps(document), encoding="utf-8")
        options = self.config_manager.load_run_config(str(path), "1.0.0")
        self.assertEqual(options, {'pattern': 'k3', 'n': 8, 'seed': 42})
    
    def test_major_version_mismatch_warns(self):
        """Test warning for documents from another major version"""
        path = Path(self.temp_dir) / "old.json"
        path.write_text(json.dumps({'library_version': '2.1.0', 'config': {'n': 8}}), encoding="utf-8")
        with self.assertLogs('config_manager', level='WARNING'):
            options = self.config_manager.load_run_config(str(path), "1.0.0")
        self.assertEqual(options, {'n': 8})
    
    def test_invalid_run_config(self):
        """Test parse errors for unreadable run configs"""
        path = Path(self.temp_dir) / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with self.assertRaises(DistGraphError) as ctx:
            self.config_manager.load_run_config(str(path), "1.0.0")
        self.assertEqual(ctx.exception.error_type, "parse")
        
        path.write_text("[1, 2]", encoding="utf-8")
        with self.assertRaises(DistGraphError):
            self.config_manager.load_run_config(str(path), "1.0.0")

if __name__ == '__main__':
    unittest.main()
