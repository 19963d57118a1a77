# Generated by Django 5.2.3 on 2025-09-02 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('level', models.CharField(max_length=20, verbose_name='Mức độ')),
                ('message', models.TextField(verbose_name='Nội dung')),
                ('timestamp', models.DateTimeField(auto_now_add=True, verbose_name='Thời gian')),
            ],
            options={
                'verbose_name': 'Log tác vụ',
                'verbose_name_plural': 'Log các tác vụ',
                'ordering': ['-timestamp'],
            },
        ),
        migrations.CreateModel(
            name='ScenarioRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100, verbose_name='Kịch bản')),
                ('topic', models.CharField(blank=True, max_length=200, verbose_name='Chủ đề')),
                ('verdict', models.CharField(choices=[('pass', 'Đạt'), ('fail', 'Không đạt')], max_length=10, verbose_name='Kết quả')),
                ('transcript', models.JSONField(default=list, verbose_name='Nhật ký các bước')),
                ('parameters', models.JSONField(blank=True, default=dict, verbose_name='Tham số')),
                ('seed', models.BigIntegerField(verbose_name='Seed')),
                ('timestamp', models.DateTimeField(auto_now_add=True, verbose_name='Thời gian chạy')),
            ],
            options={
                'verbose_name': 'Lần chạy kịch bản',
                'verbose_name_plural': 'Các lần chạy kịch bản',
                'ordering': ['-timestamp'],
            },
        ),
    ]
