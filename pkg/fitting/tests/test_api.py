from rest_framework import status
from rest_framework.test import APITestCase

from fitting.models import RunRecord


class RunRegistryApiTests(APITestCase):
    def setUp(self):
        self.fit = RunRecord.objects.create(command='fit', seed=3, config={'method': 'SEOL'},
                                            output_dir='runs/fit', manifest_path='runs/fit/manifest.json')
        RunRecord.objects.create(command='eval', seed=0, output_dir='runs/eval',
                                 manifest_path='runs/eval/manifest.json')

    def test_routes(self):
        response = self.client.get('/api/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIn('GET /api/runs/:id', response.json())

    def test_list_and_filter(self):
        self.assertEqual(len(self.client.get('/api/runs/').json()), 2)
        runs = self.client.get('/api/runs/', {'command': 'fit'}).json()
        self.assertEqual([run['id'] for run in runs], [self.fit.id])

    def test_detail(self):
        run = self.client.get(f'/api/runs/{self.fit.id}').json()
        self.assertEqual(run['config'], {'method': 'SEOL'})
        self.assertEqual(run['manifest_path'], 'runs/fit/manifest.json')

    def test_missing_run(self):
        response = self.client.get('/api/runs/999')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)
