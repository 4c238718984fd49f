import unittest

from unida.registries import (ABLATION_REGISTRY, ACTIVATION_REGISTRY,
                              SCENARIO_REGISTRY)
from unida.registry import Registry


class TestRegistry(unittest.TestCase):

    def test_registry_basic_functionality(self):
        reg = Registry('TestRegistry')

        @reg.register('example')
        class ExampleModule:
            pass

        self.assertIn('example', reg)
        self.assertIs(reg.get('example'), ExampleModule)

        with self.assertRaises(KeyError):
            reg.get('none_existent_module')

        with self.assertRaises(ValueError):
            reg.register('example')(ExampleModule)

    def test_register_uses_object_name(self):
        reg = Registry('loss')

        @reg.register()
        def entropy_loss():
            pass

        self.assertEqual(reg.names(), ['entropy_loss'])

    def test_add_plain_values_keeps_order(self):
        reg = Registry('scenario')
        reg.add('b', (1, 2))
        reg.add('a', (3, 4))
        self.assertEqual(list(reg), ['b', 'a'])
        self.assertEqual(len(reg), 2)
        self.assertEqual(reg.get('a'), (3, 4))

    def test_missing_name_lists_available(self):
        reg = Registry('activation')
        reg.add('tanh', object())
        with self.assertRaisesRegex(KeyError, 'tanh'):
            reg.get('gelu')

    def test_registry_category(self):
        reg = Registry('Backbone')
        self.assertTrue(repr(reg).startswith('Backbone: '))

    def test_package_registries_are_populated(self):
        import unida.data  # noqa: F401
        import unida.nn  # noqa: F401
        import unida.trainer  # noqa: F401
        self.assertIn('tanh', ACTIVATION_REGISTRY)
        self.assertIn('relu', ACTIVATION_REGISTRY)
        self.assertIn('office31_unida', SCENARIO_REGISTRY)
        self.assertEqual(ABLATION_REGISTRY.names(), [
            'ALL', 'w/o L_ESL', 'w/o L_SFC', 'w/o L_TOVA',
            'w/o L_ESL+L_SFC+L_TOVA'
        ])
